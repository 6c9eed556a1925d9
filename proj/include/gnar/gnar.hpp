#pragma once

#include "gnar/acf.hpp"
#include "gnar/election.hpp"
#include "gnar/errors.hpp"
#include "gnar/experiments.hpp"
#include "gnar/fit.hpp"
#include "gnar/forecast.hpp"
#include "gnar/io.hpp"
#include "gnar/model_order.hpp"
#include "gnar/network.hpp"
#include "gnar/serialize.hpp"
#include "gnar/simulate.hpp"
