#pragma once

#include "pscurv/errors.hpp"
#include "pscurv/series.hpp"
#include "pscurv/expression.hpp"
#include "pscurv/parser.hpp"
#include "pscurv/rng.hpp"
#include "pscurv/defining_function.hpp"
#include "pscurv/catalog.hpp"
#include "pscurv/wirtinger.hpp"
#include "pscurv/parallel.hpp"
#include "pscurv/surface.hpp"
#include "pscurv/secondform.hpp"
#include "pscurv/gausscurv.hpp"
#include "pscurv/webster3.hpp"
#include "pscurv/brieskorn.hpp"
