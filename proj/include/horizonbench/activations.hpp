#pragma once

#include <string>

namespace hb {

enum class Activation { Identity, Relu, Sigmoid, Tanh };

// Pointwise activation value and exact derivative at pre-activation x.
// relu'(0) is defined as 0.
double activate(Activation kind, double x);
double activate_deriv(Activation kind, double x);

std::string to_string(Activation kind);
Activation activation_from_string(const std::string& name);

}  // namespace hb
