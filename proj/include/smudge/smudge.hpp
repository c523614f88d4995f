#pragma once

// Umbrella header: the whole library.

#include "smudge/csv.hpp"
#include "smudge/exceptions.hpp"
#include "smudge/experiment.hpp"
#include "smudge/inject.hpp"
#include "smudge/learners.hpp"
#include "smudge/manifest.hpp"
#include "smudge/metrics.hpp"
#include "smudge/model.hpp"
#include "smudge/preprocess.hpp"
#include "smudge/report.hpp"
#include "smudge/rng.hpp"
#include "smudge/synthetic.hpp"
#include "smudge/table.hpp"
#include "smudge/util.hpp"
