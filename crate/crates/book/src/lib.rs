// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! The guide in `book/`, compiled so its examples run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/rates.md")]
pub mod rates {}

#[doc = include_str!("../../../book/src/states.md")]
pub mod states {}

#[doc = include_str!("../../../book/src/generator.md")]
pub mod generator {}

#[doc = include_str!("../../../book/src/reduced.md")]
pub mod reduced {}

#[doc = include_str!("../../../book/src/collective.md")]
pub mod collective {}

#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}
