#ifndef SKEWLINK_SKEWLINK_HPP
#define SKEWLINK_SKEWLINK_HPP

#include "skewlink/bayes.hpp"
#include "skewlink/dataset.hpp"
#include "skewlink/datasets.hpp"
#include "skewlink/io.hpp"
#include "skewlink/likelihood.hpp"
#include "skewlink/linalg.hpp"
#include "skewlink/links.hpp"
#include "skewlink/mle.hpp"
#include "skewlink/model_selection.hpp"
#include "skewlink/multinomial.hpp"
#include "skewlink/multinomial_data.hpp"
#include "skewlink/nelder_mead.hpp"
#include "skewlink/parallel.hpp"
#include "skewlink/special.hpp"

#endif  // SKEWLINK_SKEWLINK_HPP
