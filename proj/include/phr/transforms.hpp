#pragma once

#include "phr/transforms/builder.hpp"
#include "phr/transforms/control.hpp"
#include "phr/transforms/embed.hpp"
#include "phr/transforms/free_product.hpp"
#include "phr/transforms/intersect.hpp"
#include "phr/transforms/substitution.hpp"
