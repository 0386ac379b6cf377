#pragma once

// Umbrella header for the perimode library: periodic solutions of the
// third-order problem z'''(t) = A z(t) + f(t) by per-mode resolvent solves,
// plus the multiplier diagnostics that certify well-posedness numerically.

#include "perimode/cli.hpp"
#include "perimode/diagnosis.hpp"
#include "perimode/io.hpp"
#include "perimode/multiplier.hpp"
#include "perimode/operators.hpp"
#include "perimode/oracle.hpp"
#include "perimode/rng.hpp"
#include "perimode/signal.hpp"
#include "perimode/solver.hpp"
#include "perimode/spectra.hpp"
#include "perimode/types.hpp"
