#pragma once

#include "isoalg/conditions.hpp"
#include "isoalg/errors.hpp"
#include "isoalg/expression.hpp"
#include "isoalg/io.hpp"
#include "isoalg/linalg.hpp"
#include "isoalg/models.hpp"
#include "isoalg/norm_engine.hpp"
#include "isoalg/normal_form.hpp"
#include "isoalg/report.hpp"
#include "isoalg/runner.hpp"
#include "isoalg/star_algebra.hpp"
