#include "plategamma/loads.hpp"
