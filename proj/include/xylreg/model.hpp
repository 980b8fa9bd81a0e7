#pragma once

#include <span>
#include <string>
#include <variant>

#include "xylreg/grnn.hpp"
#include "xylreg/linear.hpp"
#include "xylreg/mlfn.hpp"

namespace xylreg {

/// Any fitted regressor.
using Model = std::variant<LinearModel, GrnnModel, MlfnModel>;

/// Prediction in raw degC. Throws ArityMismatch for a wrong-length x.
double predict(const Model& m, std::span<const double> x);

/// "linear", "grnn" or "mlfn".
std::string kind_name(const Model& m);

}  // namespace xylreg
