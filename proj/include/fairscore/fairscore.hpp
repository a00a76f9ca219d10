#pragma once

// Umbrella header: exact feasible-region geometry, optimization, and
// classifier synthesis for binary decisions on finite group-calibrated
// scores under predictive parity.

#include "fairscore/calibration.hpp"
#include "fairscore/classifier.hpp"
#include "fairscore/csv.hpp"
#include "fairscore/errors.hpp"
#include "fairscore/intersection.hpp"
#include "fairscore/json_writer.hpp"
#include "fairscore/objectives.hpp"
#include "fairscore/oracle.hpp"
#include "fairscore/region.hpp"
#include "fairscore/score_model.hpp"
