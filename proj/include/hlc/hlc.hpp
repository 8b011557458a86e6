#ifndef HLC_HLC_HPP
#define HLC_HLC_HPP

#include "hlc/error.hpp"
#include "hlc/quarter.hpp"
#include "hlc/series.hpp"
#include "hlc/csv.hpp"
#include "hlc/lti.hpp"
#include "hlc/regress.hpp"
#include "hlc/backtest.hpp"
#include "hlc/report.hpp"
#include "hlc/synthetic.hpp"
#include "hlc/config.hpp"
#include "hlc/pipeline.hpp"

#endif  // HLC_HLC_HPP
