#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secalgo/error.hpp"
#include "secalgo/labels.hpp"

// Central whitelist authority. The whitelists are compiled-in constants and
// cannot be extended at runtime.

namespace secalgo::guard {

/// Key labels as text, exactly as they arrive from keygen arguments, config
/// values or an imported key file.
struct KeySpec {
  std::string algorithm;
  std::string size;
  std::string mode;
  std::string hash;
};

/// First violation in the order algorithm (M3S), size (M1K), mode (M1S, or
/// M1A for RSA), hash (M1H). Total and side-effect free.
std::optional<MisuseClass> classify(const KeySpec& spec);

/// Throws MisuseError for the first violation. Never repairs its input.
void check_key_spec(const KeySpec& spec);

/// Re-check of already-parsed labels, used on every primitive call.
void check_labels(Algorithm a, std::string_view size, Mode m, Hash h);

/// Names the guard recognises as deliberately excluded ciphers (DES, RC4,
/// ...). Used to tell M3S apart from a plain typo.
bool is_obsolete_algorithm(std::string_view name);

std::vector<std::string> allowed_sizes(Algorithm a, Mode m);
std::vector<Mode> allowed_modes(Algorithm a);
std::vector<Hash> allowed_hashes();
bool is_allowed_size(Algorithm a, Mode m, std::string_view size);
bool is_allowed_mode(Algorithm a, Mode m);

/// Size used when the configured value is only the table default and does
/// not fit the algorithm (3DES, ECDSA, DH).
std::string default_size(Algorithm a, Mode m);
/// Mode used when the configured mode is only the table default and does not
/// fit the algorithm (64-bit block ciphers).
Mode default_mode(Algorithm a);

struct AuditRow {
  MisuseClass misuse;
  std::string description;   // what the misuse is
  std::string prevention;    // how it is prevented
  std::string enforcement;   // where in this library
  bool structural;           // no check exists because no unsafe path exists
};

std::vector<AuditRow> audit_report();

}  // namespace secalgo::guard
