#ifndef STRUCT_IMITATE_HPP
#define STRUCT_IMITATE_HPP

#include "errors.hpp"
#include "diagnostics.hpp"
#include "parallel.hpp"
#include "kernel.hpp"
#include "manifold.hpp"
#include "trajectory.hpp"
#include "euclidean.hpp"
#include "temporal.hpp"
#include "riemannian.hpp"
#include "metrics.hpp"
#include "io.hpp"

#endif // STRUCT_IMITATE_HPP
