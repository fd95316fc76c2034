#pragma once

#include "secalgo/keys.hpp"

namespace secalgo::detail {

KeyPair dh_keypair(const DhGroup& group, Hash sign_hash, SignMode sign_mode);

/// Canonical spelling of a whitelisted size, e.g. "p-256" -> "P-256".
std::string canonical_size(Algorithm a, Mode m, std::string_view size);

}  // namespace secalgo::detail
