#ifndef REPBAYES_REPBAYES_HPP
#define REPBAYES_REPBAYES_HPP

#include "repbayes/exact_models.hpp"
#include "repbayes/format.hpp"
#include "repbayes/frequentist.hpp"
#include "repbayes/io.hpp"
#include "repbayes/normal_model.hpp"
#include "repbayes/numerics.hpp"

#endif  // REPBAYES_REPBAYES_HPP
