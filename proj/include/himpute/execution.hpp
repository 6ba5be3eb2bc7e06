#pragma once

namespace himpute {

/// Selects between the OpenMP kernel and the serial reference path of the
/// multi-unit entry points (blocks, variables, trials). Both paths produce
/// bit-identical results.
enum class Execution { serial, parallel };

}  // namespace himpute
