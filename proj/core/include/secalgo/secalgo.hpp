#pragma once

#include "secalgo/bench.hpp"
#include "secalgo/bytes.hpp"
#include "secalgo/codec.hpp"
#include "secalgo/config.hpp"
#include "secalgo/error.hpp"
#include "secalgo/guard.hpp"
#include "secalgo/harness.hpp"
#include "secalgo/instrument.hpp"
#include "secalgo/keys.hpp"
#include "secalgo/labels.hpp"
#include "secalgo/primitives.hpp"
#include "secalgo/protocols.hpp"
#include "secalgo/provider.hpp"
#include "secalgo/random.hpp"
