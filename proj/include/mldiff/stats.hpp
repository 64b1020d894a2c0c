#pragma once

#include "mldiff/stats/chi2.hpp"
#include "mldiff/stats/ks.hpp"
#include "mldiff/stats/special.hpp"
#include "mldiff/stats/test_result.hpp"
