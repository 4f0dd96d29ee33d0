#pragma once

#include "floquet/classify.hpp"
#include "floquet/coefficients.hpp"
#include "floquet/contour.hpp"
#include "floquet/discriminant.hpp"
#include "floquet/errors.hpp"
#include "floquet/forms.hpp"
#include "floquet/greens.hpp"
#include "floquet/json_io.hpp"
#include "floquet/runner.hpp"
#include "floquet/spectrum.hpp"
#include "floquet/transfer.hpp"
