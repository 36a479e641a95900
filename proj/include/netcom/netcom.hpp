/// @file netcom.hpp
/// @brief Everything: GF(2) algebra, PNC mappings, OFDM modem, channels, backhaul protocol, simulator.
#pragma once

#include "netcom/catalog_io.hpp"
#include "netcom/channel.hpp"
#include "netcom/config.hpp"
#include "netcom/error.hpp"
#include "netcom/gf2.hpp"
#include "netcom/ofdm.hpp"
#include "netcom/pnc.hpp"
#include "netcom/protocol.hpp"
#include "netcom/reference_tables.hpp"
#include "netcom/report_io.hpp"
#include "netcom/sim.hpp"
