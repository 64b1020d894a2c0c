#pragma once

#include "mldiff/adapter/external.hpp"
#include "mldiff/adapter/registry.hpp"
#include "mldiff/campaign/cli.hpp"
#include "mldiff/campaign/config.hpp"
#include "mldiff/campaign/report.hpp"
#include "mldiff/campaign/runner.hpp"
#include "mldiff/classifiers/model.hpp"
#include "mldiff/classifiers/spec.hpp"
#include "mldiff/config.hpp"
#include "mldiff/csv.hpp"
#include "mldiff/dataset.hpp"
#include "mldiff/diffengine.hpp"
#include "mldiff/error.hpp"
#include "mldiff/recipe.hpp"
#include "mldiff/rng.hpp"
#include "mldiff/stats.hpp"
