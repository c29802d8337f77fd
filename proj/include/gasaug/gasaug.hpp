#pragma once

#include "gasaug/alpha_shape.hpp"
#include "gasaug/augment.hpp"
#include "gasaug/core.hpp"
#include "gasaug/delaunay.hpp"
#include "gasaug/error.hpp"
#include "gasaug/eval.hpp"
#include "gasaug/gas_gen.hpp"
#include "gasaug/io.hpp"
#include "gasaug/kdtree.hpp"
#include "gasaug/loss.hpp"
#include "gasaug/parallel.hpp"
#include "gasaug/predicates.hpp"
#include "gasaug/resampler.hpp"
#include "gasaug/rng.hpp"

namespace gasaug {

#ifdef GASAUG_VERSION
inline constexpr const char* kVersion = GASAUG_VERSION;
#else
inline constexpr const char* kVersion = "0.1.0";
#endif

}  // namespace gasaug
