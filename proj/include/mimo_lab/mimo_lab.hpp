#pragma once

#include <mimo_lab/analytic.hpp>
#include <mimo_lab/channel.hpp>
#include <mimo_lab/config.hpp>
#include <mimo_lab/engine.hpp>
#include <mimo_lab/errors.hpp>
#include <mimo_lab/impairments.hpp>
#include <mimo_lab/numerics.hpp>
#include <mimo_lab/precoding.hpp>
#include <mimo_lab/sweep.hpp>
#include <mimo_lab/validation.hpp>
