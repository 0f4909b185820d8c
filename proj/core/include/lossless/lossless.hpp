#pragma once

#include "lossless/ensemble.hpp"
#include "lossless/errors.hpp"
#include "lossless/harmonic.hpp"
#include "lossless/impulse_response.hpp"
#include "lossless/input_signal.hpp"
#include "lossless/interconnect.hpp"
#include "lossless/lti.hpp"
#include "lossless/memory.hpp"
#include "lossless/numerics.hpp"
