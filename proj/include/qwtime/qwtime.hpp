#pragma once

#include "qwtime/decay.hpp"
#include "qwtime/dispersion.hpp"
#include "qwtime/energy.hpp"
#include "qwtime/error.hpp"
#include "qwtime/io.hpp"
#include "qwtime/parallel.hpp"
#include "qwtime/spectral.hpp"
#include "qwtime/time_operator.hpp"
#include "qwtime/walks.hpp"
