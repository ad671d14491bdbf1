#pragma once

#include "hyperlab/error.hpp"
#include "hyperlab/grid.hpp"
#include "hyperlab/quadrature.hpp"
#include "hyperlab/fourier.hpp"
#include "hyperlab/closed_form.hpp"
#include "hyperlab/measure.hpp"
#include "hyperlab/semigroup.hpp"
#include "hyperlab/functional.hpp"
#include "hyperlab/schedule.hpp"
#include "hyperlab/report.hpp"
#include "hyperlab/test_function.hpp"
#include "hyperlab/hypercheck.hpp"
#include "hyperlab/hjb.hpp"
#include "hyperlab/transport.hpp"
#include "hyperlab/levy.hpp"
#include "hyperlab/corpus.hpp"
