#pragma once

#include "wisheig/eigdist/diagnostics.hpp"
#include "wisheig/eigdist/largest.hpp"
#include "wisheig/eigdist/laplace.hpp"
#include "wisheig/eigdist/ratio.hpp"
#include "wisheig/eigdist/spiked.hpp"
