#pragma once

#include "symentropy/correlation.hpp"
#include "symentropy/csv.hpp"
#include "symentropy/entropy.hpp"
#include "symentropy/error.hpp"
#include "symentropy/ingest.hpp"
#include "symentropy/markov.hpp"
#include "symentropy/sequence.hpp"

namespace symentropy {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace symentropy
