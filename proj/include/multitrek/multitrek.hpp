#pragma once

#include "multitrek/errors.hpp"
#include "multitrek/scalar.hpp"
#include "multitrek/graph.hpp"
#include "multitrek/tensor.hpp"
#include "multitrek/polynomial.hpp"
#include "multitrek/trek.hpp"
#include "multitrek/cumulant.hpp"
#include "multitrek/decision.hpp"
#include "multitrek/moments.hpp"
#include "multitrek/estimation.hpp"
