#pragma once

// Umbrella header for the whole engine.

#include "bfv/bracket.hpp"
#include "bfv/charge.hpp"
#include "bfv/element.hpp"
#include "bfv/gauge.hpp"
#include "bfv/ghost_word.hpp"
#include "bfv/koszul.hpp"
#include "bfv/numeric_flow.hpp"
#include "bfv/parse.hpp"
#include "bfv/poisson.hpp"
#include "bfv/poly.hpp"
#include "bfv/rational.hpp"
#include "bfv/scenario.hpp"
#include "bfv/vartable.hpp"
#include "bfv/witness.hpp"
