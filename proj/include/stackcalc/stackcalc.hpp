#pragma once

#include "stackcalc/denote.hpp"
#include "stackcalc/frontend.hpp"
#include "stackcalc/lambdamu.hpp"
#include "stackcalc/machine.hpp"
#include "stackcalc/prover.hpp"
#include "stackcalc/reduction.hpp"
#include "stackcalc/syntax.hpp"
#include "stackcalc/typesys.hpp"
