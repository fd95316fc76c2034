#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "secalgo/secalgo.hpp"

namespace secalgo::cli {

namespace {

// Raised for bad files and flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw UsageError("cannot write " + path);
}

void write_text(const std::string& path, std::string_view text) {
  write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

KeyEnvelope read_key(const std::string& path) { return import_key(to_string(read_file(path))); }

// Precedence, lowest first: defaults, $SECALGO_CONFIG, --config, --set.
config::Scope build_scope(const std::string& config_file, const std::vector<std::string>& sets) {
  config::Scope scope;
  if (const char* env = std::getenv("SECALGO_CONFIG"); env && *env) scope = config::load_config_file(env, scope);
  if (!config_file.empty()) scope = config::load_config_file(config_file, scope);
  if (!sets.empty()) {
    scope = scope.child();
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects item=value, got '" + s + "'");
      auto trim = [](std::string v) {
        const auto b = v.find_first_not_of(" \t");
        const auto e = v.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
      };
      scope = config::set_config(scope, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
  }
  return scope;
}

struct Flags {
  std::string config_file;
  std::vector<std::string> sets;

  std::string type, size, mode, hash, sign_mode, key, in, out, sig;
  std::string protocol;
  int reps = 1;
  std::optional<std::uint64_t> seed;
  double min_seconds = 1.0;
  bool json = false;
  bool concurrent = false;
  bool shared_only = false, public_only = false;
};

int cmd_keygen(const Flags& f, std::ostream& out) {
  KeygenOptions opts;
  if (!f.size.empty()) opts.size = f.size;
  if (!f.mode.empty()) opts.mode = f.mode;
  if (!f.hash.empty()) opts.sign_hash = f.hash;
  if (!f.sign_mode.empty()) opts.sign_mode = f.sign_mode;
  auto k = keygen(f.type, config::global_scope(), opts);
  if (auto* e = std::get_if<KeyEnvelope>(&k)) {
    write_text(f.out, export_key(*e));
    out << f.out << "\n";
  } else {
    auto& p = std::get<KeyPair>(k);
    write_text(f.out, export_key(p.private_key));
    write_text(f.out + ".pub", export_key(p.public_key));
    out << f.out << "\n" << f.out << ".pub\n";
  }
  return Exit::ok;
}

int cmd_encrypt(const Flags& f) {
  KeyEnvelope key = read_key(f.key);
  Bytes pt = read_file(f.in);
  write_file(f.out, encrypt_raw(pt, key).serialize());
  return Exit::ok;
}

// Every failure after the key has loaded reads the same, whatever its cause.
int cmd_decrypt(const Flags& f, std::ostream& err) {
  KeyEnvelope key = read_key(f.key);
  Bytes wire = read_file(f.in);
  Bytes pt;
  try {
    pt = decrypt_raw(CipherEnvelope::parse(wire), key);
  } catch (const MisuseError&) {
    throw;
  } catch (const Error&) {
    err << "error: decryption failed\n";
    return Exit::crypto_failure;
  }
  write_file(f.out, pt);
  return Exit::ok;
}

int cmd_sign(const Flags& f) {
  KeyEnvelope key = read_key(f.key);
  Bytes text = read_file(f.in);
  SignOutput s = sign_raw(text, key);
  if (auto* d = std::get_if<Signature>(&s)) {
    if (f.sig.empty()) throw UsageError("the key signs in detached mode; --sig is required");
    write_file(f.sig, codec::encode(d->to_value()));
  } else {
    if (f.out.empty()) throw UsageError("the key signs in combined mode; --out is required");
    write_file(f.out, codec::encode(std::get<SignedPayload>(s).to_value()));
  }
  return Exit::ok;
}

int cmd_verify(const Flags& f, std::ostream& out, std::ostream& err) {
  KeyEnvelope key = read_key(f.key);
  Bytes input = read_file(f.in);
  bool good = false;
  try {
    if (!f.sig.empty()) {
      good = verify_raw(input, Signature::from_value(codec::decode(read_file(f.sig))), key);
    } else {
      auto text = verify_raw(SignedPayload::from_value(codec::decode(input)), key);
      good = text.has_value();
      if (good && !f.out.empty()) write_file(f.out, *text);
    }
  } catch (const MalformedEncoding&) {
    good = false;
  } catch (const DepthExceeded&) {
    good = false;
  }
  if (!good) {
    err << "error: verification failed\n";
    return Exit::crypto_failure;
  }
  out << "OK\n";
  return Exit::ok;
}

int cmd_audit(const Flags& f, std::ostream& out) {
  auto rows = guard::audit_report();
  if (f.json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      j.push_back({{"code", code(r.misuse)},
                   {"description", r.description},
                   {"prevention", r.prevention},
                   {"enforcement", r.enforcement},
                   {"structural", r.structural}});
    out << j.dump(2) << "\n";
    return Exit::ok;
  }
  for (const auto& r : rows) {
    out << code(r.misuse) << "  " << r.description << "\n"
        << "     prevention:  " << r.prevention << "\n"
        << "     enforcement: " << r.enforcement << (r.structural ? " (structural)" : "") << "\n";
  }
  return Exit::ok;
}

int cmd_run_protocol(const Flags& f, std::ostream& out) {
  harness::RunOptions opts;
  opts.seed = f.seed;
  if (f.concurrent) opts.scheduling = harness::Scheduling::concurrent;
  if (f.reps < 1) throw UsageError("--reps must be at least 1");

  std::vector<harness::ProtocolTrace> traces;
  for (int i = 0; i < f.reps; ++i) traces.push_back(protocols::run(f.protocol, opts));
  const auto& last = traces.back();
  double lib = 0, proto = 0;
  for (const auto& t : traces) {
    lib += t.library_ms();
    proto += t.protocol_ms();
  }
  lib /= f.reps;
  proto /= f.reps;

  if (f.json) {
    auto j = nlohmann::ordered_json::parse(last.to_json());
    j["repetitions"] = f.reps;
    j["mean_library_ms"] = lib;
    j["mean_protocol_ms"] = proto;
    out << j.dump(2) << "\n";
    return Exit::ok;
  }
  out << "protocol " << last.protocol << ": " << last.messages.size() << " messages\n";
  for (std::size_t i = 0; i < instrument::kPrimitiveCount; ++i)
    out << "  " << instrument::name(static_cast<instrument::Primitive>(i)) << " " << last.calls.calls[i] << "\n";
  out << "  total " << last.calls.total() << "\n";
  out << "  library_ms " << lib << "\n  protocol_ms " << proto << "\n";
  for (const auto& [role, vals] : last.outputs)
    for (const auto& v : vals) out << "  output " << role << " " << codec::debug_string(v) << "\n";
  return Exit::ok;
}

int cmd_bench(const Flags& f, std::ostream& out, std::ostream& err) {
  bench::BenchOptions opts;
  opts.min_seconds = f.min_seconds;
  opts.repetitions = f.reps;
  opts.shared_ops = !f.public_only;
  opts.public_ops = !f.shared_only;
  opts.progress = [&err](const bench::BenchRow& r) {
    err << "done: " << r.group << " " << r.operation << "\n";
  };
  auto rows = bench::run(opts);
  out << (f.json ? bench::to_json(rows) + "\n" : bench::to_table(rows));
  return Exit::ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Misuse-resistant cryptography: keys, files, protocols, benchmarks"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config_file, "Configuration file (item = value per line)");
  app.add_option("--set", f.sets, "Configuration binding item=value; repeatable");

  auto* keygen_cmd = app.add_subcommand("keygen", "Generate a key; key pairs also write OUT.pub");
  keygen_cmd->add_option("--type", f.type, "Algorithm name, 'shared' or 'public'")->required();
  keygen_cmd->add_option("--size", f.size, "Key size in bits, curve or DH group");
  keygen_cmd->add_option("--mode", f.mode, "Mode of operation");
  keygen_cmd->add_option("--hash", f.hash, "Signing hash");
  keygen_cmd->add_option("--sign-mode", f.sign_mode, "combined or detached");
  keygen_cmd->add_option("--out", f.out, "Key file")->required();

  auto* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt a file");
  auto* decrypt_cmd = app.add_subcommand("decrypt", "Decrypt a file");
  for (auto* c : {encrypt_cmd, decrypt_cmd}) {
    c->add_option("--key", f.key, "Key file")->required();
    c->add_option("--in", f.in, "Input file")->required();
    c->add_option("--out", f.out, "Output file")->required();
  }

  auto* sign_cmd = app.add_subcommand("sign", "Sign a file");
  sign_cmd->add_option("--key", f.key, "Key file")->required();
  sign_cmd->add_option("--in", f.in, "File to sign")->required();
  sign_cmd->add_option("--sig", f.sig, "Detached signature output");
  sign_cmd->add_option("--out", f.out, "Combined output");

  auto* verify_cmd = app.add_subcommand("verify", "Verify a detached or combined signature");
  verify_cmd->add_option("--key", f.key, "Key file")->required();
  verify_cmd->add_option("--in", f.in, "Signed file, or combined payload when --sig is absent")->required();
  verify_cmd->add_option("--sig", f.sig, "Detached signature");
  verify_cmd->add_option("--out", f.out, "Write the recovered text of a combined payload");

  auto* audit_cmd = app.add_subcommand("audit", "Show how each misuse class is prevented");
  audit_cmd->add_flag("--json", f.json, "JSON output");

  auto* proto_cmd = app.add_subcommand("run-protocol", "Run a protocol and report its trace");
  proto_cmd->add_option("protocol", f.protocol, "ns-sk, ns-pk, ds, ds-simp or sdh")
      ->required()
      ->check(CLI::IsMember(protocols::names()));
  proto_cmd->add_option("--reps", f.reps, "Runs to average");
  proto_cmd->add_option("--seed", f.seed, "Seed every random draw");
  proto_cmd->add_flag("--concurrent", f.concurrent, "Free-running scheduling instead of deterministic");
  proto_cmd->add_flag("--json", f.json, "JSON output");

  auto* bench_cmd = app.add_subcommand("bench", "Wrapped vs direct provider overhead");
  bench_cmd->add_option("--min-seconds", f.min_seconds, "Length of each measurement loop");
  bench_cmd->add_option("--reps", f.reps, "Measurement loops per operation")->default_val(50);
  bench_cmd->add_flag("--shared-only", f.shared_only, "Only shared-key operations");
  bench_cmd->add_flag("--public-only", f.public_only, "Only public-key operations");
  bench_cmd->add_flag("--json", f.json, "JSON output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? Exit::ok : Exit::usage;
  }

  try {
    config::set_global_scope(build_scope(f.config_file, f.sets));
    if (keygen_cmd->parsed()) return cmd_keygen(f, out);
    if (encrypt_cmd->parsed()) return cmd_encrypt(f);
    if (decrypt_cmd->parsed()) return cmd_decrypt(f, err);
    if (sign_cmd->parsed()) return cmd_sign(f);
    if (verify_cmd->parsed()) return cmd_verify(f, out, err);
    if (audit_cmd->parsed()) return cmd_audit(f, out);
    if (proto_cmd->parsed()) return cmd_run_protocol(f, out);
    if (bench_cmd->parsed()) return cmd_bench(f, out, err);
  } catch (const MisuseError& e) {
    err << "error: " << e.what() << "\n";
    return Exit::misuse;
  } catch (const DisallowedValue& e) {
    err << "error: ";
    if (e.misuse()) err << code(*e.misuse()) << " (" << description(*e.misuse()) << "): ";
    err << e.what() << "\n";
    return e.misuse() ? Exit::misuse : Exit::usage;
  } catch (const DecryptionFailure&) {
    err << "error: decryption failed\n";
    return Exit::crypto_failure;
  } catch (const VerificationFailed& e) {
    err << "error: " << e.what() << "\n";
    return Exit::crypto_failure;
  } catch (const WrongKeyPart& e) {
    err << "error: " << e.what() << "\n";
    return Exit::crypto_failure;
  } catch (const DegenerateValue& e) {
    err << "error: " << e.what() << "\n";
    return Exit::crypto_failure;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return Exit::usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return Exit::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return Exit::usage;
  }
  return Exit::usage;
}

}  // namespace secalgo::cli
