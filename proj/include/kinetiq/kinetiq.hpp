#pragma once

#include "kinetiq/units.hpp"
#include "kinetiq/errors.hpp"
#include "kinetiq/circuit.hpp"
#include "kinetiq/modes.hpp"
#include "kinetiq/fock.hpp"
#include "kinetiq/spectrum.hpp"
#include "kinetiq/nelder_mead.hpp"
#include "kinetiq/fit.hpp"
#include "kinetiq/gmm.hpp"
#include "kinetiq/readout.hpp"
#include "kinetiq/calibration.hpp"
#include "kinetiq/io.hpp"
