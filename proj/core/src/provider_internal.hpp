#pragma once

#include <memory>

#include "secalgo/provider.hpp"

namespace secalgo::provider {

std::unique_ptr<Provider> make_openssl_provider();

}  // namespace secalgo::provider
