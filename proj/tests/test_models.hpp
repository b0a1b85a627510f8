#pragma once

// Shared model texts used across the test suite.

inline const char* kSchloglBimodal = R"(
# autocatalytic birth-death network, bimodal parameter set
species S
param k1 = 0.025
param k2 = 4.17e-5
param k3 = 60
param k4 = 3.127
reaction 2 S -> 3 S : mass_action(k1)
reaction 3 S -> 2 S : mass_action(k2)
reaction 0 -> S : mass_action(k3)
reaction S -> 0 : mass_action(k4)
)";

inline const char* kSchloglUnimodal = R"(
species S
param k1 = 6
param k2 = 0.3333333333333333
param k3 = 50
param k4 = 3
reaction 2 S -> 3 S : mass_action(k1)
reaction 3 S -> 2 S : mass_action(k2)
reaction 0 -> S : mass_action(k3)
reaction S -> 0 : mass_action(k4)
)";

inline const char* kToggle = R"(
# two mutually repressing genes
species P1 P2
reaction 0 -> P1 : 20 / (1 + P2)
reaction P1 -> 0 : P1
reaction 0 -> P2 : 20 / (1 + P1)
reaction P2 -> 0 : P2
)";
