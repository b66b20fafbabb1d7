// Copyright 2026 The unscathed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Probability that a sniper placed among a unit-rate Poisson crowd, where
//! everyone shoots their nearest neighbour, is left unscathed.
//!
//! The quantity is P = c_2 − c_3 + c_4 − c_5, where c_n is the expected
//! number of n-point sets that all shoot the origin. The crate evaluates the
//! c_n through a reduced multiple-integral form split over twelve regions,
//! and cross-checks the result by direct simulation.

pub mod cubature;
pub mod geometry;
pub mod montecarlo;
pub mod parametrization;
pub mod regions;
pub mod report;
pub mod sum;
pub mod verify;
