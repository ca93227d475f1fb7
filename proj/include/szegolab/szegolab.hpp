#pragma once

// Umbrella header: the whole library in dependency order.

#include "szegolab/errors.hpp"
#include "szegolab/laurent.hpp"
#include "szegolab/fft.hpp"
#include "szegolab/symbol.hpp"
#include "szegolab/exp_symbol.hpp"
#include "szegolab/toeplitz.hpp"
#include "szegolab/fit.hpp"
#include "szegolab/szego.hpp"
#include "szegolab/rng.hpp"
#include "szegolab/quadrature.hpp"
#include "szegolab/cue.hpp"
#include "szegolab/config.hpp"
#include "szegolab/report.hpp"
#include "szegolab/runner.hpp"
