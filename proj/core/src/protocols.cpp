#include "secalgo/protocols.hpp"

#include <chrono>
#include <stdexcept>

#include "secalgo/error.hpp"
#include "secalgo/keys.hpp"
#include "secalgo/random.hpp"

namespace secalgo::protocols {

namespace {

using codec::Tuple;
using codec::Value;
using config::Item;
using harness::Process;
using harness::RunOptions;
using harness::Runtime;

constexpr std::size_t kNonceBytes = 16;

void expect(bool ok, const std::string& what) {
  if (!ok) throw VerificationFailed(what);
}

Value nonce() { return Value(random_bytes(kNonceBytes)); }

// A positive 62-bit integer nonce for the decrement handshake.
std::int64_t int_nonce() { return static_cast<std::int64_t>(random_u64() >> 2) + 1; }

KeyEnvelope shared_key(const config::Scope& scope) { return keygen_shared("shared", scope); }

KeyPair signing_pair(const config::Scope& scope, SignMode mode) {
  return keygen_pair("public", scope, {.sign_mode = std::string(name(mode))});
}

Value unwrap_combined(const Value& wire, const KeyEnvelope& pub) {
  auto text = verify(SignedPayload::from_value(wire), pub);
  expect(text.has_value(), "signature check failed");
  return *text;
}

}  // namespace

Certificate issue_certificate(std::string_view subject, const KeyEnvelope& subject_public,
                              std::int64_t timestamp, const KeyEnvelope& authority_private) {
  Value body = Tuple{Value(subject), to_value(subject_public), Value(timestamp)};
  SignOutput out = sign(body, authority_private);
  auto* wrapper = std::get_if<SignedPayload>(&out);
  if (!wrapper) throw std::invalid_argument("certificate authority keys must sign in combined mode");
  return {std::string(subject), subject_public, timestamp, std::move(*wrapper)};
}

Certificate check_certificate(const Value& wire, const KeyEnvelope& authority_public, std::int64_t now,
                              std::int64_t window) {
  SignedPayload sp;
  try {
    sp = SignedPayload::from_value(wire);
  } catch (const MalformedEncoding&) {
    throw VerificationFailed("certificate is malformed");
  }
  auto text = verify(sp, authority_public);
  expect(text.has_value(), "certificate signature does not verify");
  const auto& t = text->as_tuple(3);
  Certificate c{t[0].as_string(), key_from_value(t[1]), t[2].as_int(), std::move(sp)};
  if (c.timestamp > now + window || c.timestamp < now - window)
    throw StaleCertificate("certificate for " + c.subject + " is outside the freshness window");
  return c;
}

harness::ProtocolTrace run_ns_sk(const RunOptions& options) {
  Runtime rt(options);
  const KeyEnvelope kas = shared_key(rt.scope());
  const KeyEnvelope kbs = shared_key(rt.scope());

  rt.spawn("A", [kas](Process& p) {
    p.send(1, "A", "B");
    Value from_b = p.receive(2, "B").payload;
    Value na = nonce();
    p.send(3, Tuple{"A", "B", na, from_b}, "S");

    Value reply = decrypt(p.receive(4, "S").payload, kas);
    const auto& r = reply.as_tuple(4);
    expect(r[0] == na && r[1] == Value("B"), "server reply does not match the request");
    KeyEnvelope kab = key_from_value(r[2]);
    p.send(5, r[3], "B");

    std::int64_t nb2 = decrypt(p.receive(6, "B").payload, kab).as_int();
    p.send(7, encrypt(Value(nb2 - 1), kab).to_value(), "B");
    p.output(Value(kab.material().view()));
  });

  rt.spawn("B", [kbs](Process& p) {
    p.receive(1, "A");
    Value nb = nonce();
    p.send(2, encrypt(Tuple{"A", nb}, kbs).to_value(), "A");

    Value ticket = decrypt(p.receive(5, "A").payload, kbs);
    const auto& t = ticket.as_tuple(3);
    expect(t[1] == Value("A") && t[2] == nb, "ticket is not for this session");
    KeyEnvelope kab = key_from_value(t[0]);

    std::int64_t nb2 = int_nonce();
    p.send(6, encrypt(Value(nb2), kab).to_value(), "A");
    expect(decrypt(p.receive(7, "A").payload, kab).as_int() == nb2 - 1, "key confirmation failed");
    p.output(Value(kab.material().view()));
  });

  rt.spawn("S", [kas, kbs](Process& p) {
    Value req = p.receive(3, "A").payload;
    const auto& r = req.as_tuple(4);
    Value inner = decrypt(r[3], kbs);
    const auto& in = inner.as_tuple(2);
    expect(in[0] == r[0], "initiator name mismatch");
    KeyEnvelope kab = shared_key(p.scope());
    Value ticket = encrypt(Tuple{to_value(kab), r[0], in[1]}, kbs).to_value();
    p.send(4, encrypt(Tuple{r[2], r[1], to_value(kab), ticket}, kas).to_value(), "A");
  });

  return rt.run("ns-sk");
}

harness::ProtocolTrace run_ns_pk(const RunOptions& options) {
  Runtime rt(options);
  const KeyPair a = signing_pair(rt.scope(), SignMode::combined);
  const KeyPair b = signing_pair(rt.scope(), SignMode::combined);
  const KeyPair s = signing_pair(rt.scope(), SignMode::combined);

  rt.spawn("A", [a, pks = s.public_key](Process& p) {
    p.send(1, Tuple{"A", "B"}, "S");
    Value cert = unwrap_combined(p.receive(2, "S").payload, pks);
    const auto& c = cert.as_tuple(2);
    expect(c[0] == Value("B"), "key server answered for the wrong principal");
    KeyEnvelope pkb = key_from_value(c[1]);

    Value na = nonce();
    p.send(3, encrypt(Tuple{na, "A"}, pkb).to_value(), "B");
    Value m6 = decrypt(p.receive(6, "B").payload, a.private_key);
    const auto& t = m6.as_tuple(3);
    expect(t[0] == na && t[2] == Value("B"), "responder reply does not match");
    p.send(7, encrypt(t[1], pkb).to_value(), "B");
    p.output(Tuple{na, t[1]});
  });

  rt.spawn("B", [b, pks = s.public_key](Process& p) {
    Value m3 = decrypt(p.receive(3, "A").payload, b.private_key);
    const auto& t = m3.as_tuple(2);
    expect(t[1] == Value("A"), "unexpected initiator");
    p.send(4, Tuple{"B", "A"}, "S");
    Value cert = unwrap_combined(p.receive(5, "S").payload, pks);
    const auto& c = cert.as_tuple(2);
    expect(c[0] == Value("A"), "key server answered for the wrong principal");
    KeyEnvelope pka = key_from_value(c[1]);

    Value nb = nonce();
    p.send(6, encrypt(Tuple{t[0], nb, "B"}, pka).to_value(), "A");
    expect(decrypt(p.receive(7, "A").payload, b.private_key) == nb, "initiator did not return the nonce");
    p.output(Tuple{t[0], nb});
  });

  rt.spawn("S", [s, pka = a.public_key, pkb = b.public_key](Process& p) {
    auto lookup = [&](const Value& who) { return who == Value("A") ? pka : pkb; };
    Value r1 = p.receive(1, "A").payload;
    const auto& q1 = r1.as_tuple(2);
    p.send(2, to_value(sign(Tuple{q1[1], to_value(lookup(q1[1]))}, s.private_key)), "A");
    Value r2 = p.receive(4, "B").payload;
    const auto& q2 = r2.as_tuple(2);
    p.send(5, to_value(sign(Tuple{q2[1], to_value(lookup(q2[1]))}, s.private_key)), "B");
  });

  return rt.run("ns-pk");
}

harness::ProtocolTrace run_ds(const RunOptions& options) {
  Runtime rt(options);
  const KeyPair as = signing_pair(rt.scope(), SignMode::combined);
  const KeyPair a = signing_pair(rt.scope(), SignMode::combined);
  const KeyPair b = signing_pair(rt.scope(), SignMode::combined);

  rt.spawn("A", [a, pkas = as.public_key](Process& p) {
    p.send(1, Tuple{"A", "B"}, "AS");
    Value certs = p.receive(2, "AS").payload;
    const auto& c = certs.as_tuple(2);
    Certificate ca = check_certificate(c[0], pkas, p.now());
    Certificate cb = check_certificate(c[1], pkas, p.now());
    expect(ca.subject == "A" && cb.subject == "B", "certificates name the wrong principals");

    KeyEnvelope ck = shared_key(p.scope());
    SignOutput signed_key = sign(Tuple{to_value(ck), Value(p.now())}, a.private_key);
    CipherEnvelope enc = encrypt(to_value(signed_key), cb.subject_public_key);
    p.send(3, Tuple{c[0], c[1], enc.to_value()}, "B");
    p.output(Value(ck.material().view()));
  });

  rt.spawn("B", [b, pkas = as.public_key](Process& p) {
    Value m3 = p.receive(3, "A").payload;
    const auto& t = m3.as_tuple(3);
    Certificate ca = check_certificate(t[0], pkas, p.now());
    Certificate cb = check_certificate(t[1], pkas, p.now());
    expect(ca.subject == "A" && cb.subject == "B", "certificates name the wrong principals");
    expect(cb.subject_public_key == b.public_key, "message is not addressed to this principal");

    Value inner = unwrap_combined(decrypt(t[2], b.private_key), ca.subject_public_key);
    const auto& k = inner.as_tuple(2);
    std::int64_t stamp = k[1].as_int();
    if (stamp > p.now() + kCertificateWindowSeconds || stamp < p.now() - kCertificateWindowSeconds)
      throw StaleCertificate("session key timestamp is outside the freshness window");
    KeyEnvelope ck = key_from_value(k[0]);
    p.output(Value(ck.material().view()));
  });

  rt.spawn("AS", [as, pka = a.public_key, pkb = b.public_key](Process& p) {
    Value req = p.receive(1, "A").payload;
    const auto& r = req.as_tuple(2);
    expect(r[0] == Value("A") && r[1] == Value("B"), "unknown principals");
    std::int64_t now = p.now();
    Certificate ca = issue_certificate("A", pka, now, as.private_key);
    Certificate cb = issue_certificate("B", pkb, now, as.private_key);
    p.send(2, Tuple{ca.wrapper.to_value(), cb.wrapper.to_value()}, "A");
  });

  return rt.run("ds");
}

harness::ProtocolTrace run_ds_simplified(const RunOptions& options, SignMode sign_mode) {
  Runtime rt(options);
  const config::Scope scope = rt.scope().set(Item::sign_mode, name(sign_mode));
  const KeyPair a = keygen_pair("public", scope);
  const KeyPair b = keygen_pair("public", scope);

  rt.spawn(
      "A",
      [ska = a.private_key, pkb = b.public_key, sign_mode](Process& p) {
        KeyEnvelope k = shared_key(p.scope());
        SignOutput s = sign(to_value(k), ska);
        Value body = sign_mode == SignMode::combined ? to_value(s) : Value(Tuple{to_value(k), to_value(s)});
        p.send(1, encrypt(body, pkb).to_value(), "B");
        p.output(decrypt(p.receive(2, "B").payload, k));
      },
      scope);

  rt.spawn(
      "B",
      [skb = b.private_key, pka = a.public_key, sign_mode](Process& p) {
        Value m = decrypt(p.receive(1, "A").payload, skb);
        Value kv;
        if (sign_mode == SignMode::combined) {
          kv = unwrap_combined(m, pka);
        } else {
          const auto& t = m.as_tuple(2);
          expect(verify(t[0], Signature::from_value(t[1]), pka), "signature check failed");
          kv = t[0];
        }
        KeyEnvelope k = key_from_value(kv);
        p.send(2, encrypt(Value("secret"), k).to_value(), "A");
      },
      scope);

  return rt.run("ds-simp");
}

harness::ProtocolTrace run_sdh(const RunOptions& options, std::string_view group) {
  Runtime rt(options);
  const KeyPair a = signing_pair(rt.scope(), SignMode::detached);
  const KeyPair b = signing_pair(rt.scope(), SignMode::detached);
  const std::string g(group);

  auto peer_key = [g](const Value& v, const KeyEnvelope& mine) {
    return KeyEnvelope::create(Algorithm::dh, g, Mode::none, KeyPart::public_part, mine.sign_hash(),
                               mine.sign_mode(), SecureBytes(ByteView(v.as_bytes())));
  };

  rt.spawn("A", [ska = a.private_key, pkb = b.public_key, g, peer_key](Process& p) {
    // The session identifier is fresh shared-key material.
    KeyEnvelope sid = shared_key(p.scope());
    Value s(sid.material().view());
    KeyPair x = dh_keygen(g);
    Value gx(x.public_key.material().view());
    p.send(1, Tuple{s, gx}, "B");

    Value m2 = p.receive(2, "B").payload;
    const auto& t = m2.as_tuple(3);
    expect(t[0] == s, "session id mismatch");
    const Value& gy = t[1];
    expect(verify(Tuple{s, gx, gy, "A"}, Signature::from_value(t[2]), pkb), "responder signature invalid");
    Bytes secret = dh_shared_secret(x.private_key, peer_key(gy, x.private_key));
    p.send(3, Tuple{s, std::get<Signature>(sign(Tuple{s, gy, gx, "B"}, ska)).to_value()}, "B");
    p.output(Value(std::move(secret)));
  });

  rt.spawn("B", [skb = b.private_key, pka = a.public_key, g, peer_key](Process& p) {
    Value m1 = p.receive(1, "A").payload;
    const auto& t = m1.as_tuple(2);
    const Value& s = t[0];
    const Value& gx = t[1];
    KeyPair y = dh_keygen(g);
    Value gy(y.public_key.material().view());
    p.send(2, Tuple{s, gy, std::get<Signature>(sign(Tuple{s, gx, gy, "A"}, skb)).to_value()}, "A");

    Value m3 = p.receive(3, "A").payload;
    const auto& r = m3.as_tuple(2);
    expect(r[0] == s, "session id mismatch");
    expect(verify(Tuple{s, gy, gx, "B"}, Signature::from_value(r[1]), pka), "initiator signature invalid");
    p.output(Value(dh_shared_secret(y.private_key, peer_key(gx, y.private_key))));
  });

  return rt.run("sdh");
}

std::vector<std::string> names() { return {"ns-sk", "ns-pk", "ds", "ds-simp", "sdh"}; }

harness::ProtocolTrace run(std::string_view protocol, const RunOptions& options) {
  if (protocol == "ns-sk") return run_ns_sk(options);
  if (protocol == "ns-pk") return run_ns_pk(options);
  if (protocol == "ds") return run_ds(options);
  if (protocol == "ds-simp") return run_ds_simplified(options);
  if (protocol == "sdh") return run_sdh(options);
  throw std::invalid_argument("unknown protocol '" + std::string(protocol) + "'");
}

}  // namespace secalgo::protocols
