#pragma once

#include "soilmine/attributes.hpp"
#include "soilmine/c45.hpp"
#include "soilmine/class_distribution.hpp"
#include "soilmine/cross_validation.hpp"
#include "soilmine/dataset.hpp"
#include "soilmine/default_rules.hpp"
#include "soilmine/error.hpp"
#include "soilmine/folds.hpp"
#include "soilmine/format.hpp"
#include "soilmine/info_theory.hpp"
#include "soilmine/linear_model.hpp"
#include "soilmine/metrics.hpp"
#include "soilmine/model_io.hpp"
#include "soilmine/models.hpp"
#include "soilmine/naive_bayes.hpp"
#include "soilmine/regression.hpp"
#include "soilmine/report.hpp"
#include "soilmine/ripper.hpp"
#include "soilmine/rng.hpp"
#include "soilmine/rules.hpp"
#include "soilmine/synth.hpp"
