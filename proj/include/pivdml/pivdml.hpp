#ifndef PIVDML_PIVDML_HPP
#define PIVDML_PIVDML_HPP

// Double machine learning for partially linear panel IV regression on first
// differences, with weak-instrument diagnostics and identification-robust
// confidence sets.

#include "boosting.hpp"
#include "dictionary.hpp"
#include "dml.hpp"
#include "lasso.hpp"
#include "learner.hpp"
#include "mc.hpp"
#include "mlp.hpp"
#include "numeric.hpp"
#include "ols.hpp"
#include "panel.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "tsls.hpp"
#include "weak_iv.hpp"

#endif
