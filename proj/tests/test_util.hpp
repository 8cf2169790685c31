#pragma once

#include <cmath>

inline double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }
