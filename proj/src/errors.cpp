#include "estrace/errors.hpp"
