//! Hypersurface families in R⁴ that contain a given curve as an isogeodesic.
//!
//! The guide in `book/` walks through the modules in pipeline order; its
//! snippets run as doc-tests of this crate.

pub mod curve;
pub mod expr;
pub mod family;
pub mod linalg4;
pub mod validator;
pub mod projection;
pub mod io;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/meshes.md")]
    mod meshes {}
    #[doc = include_str!("../../../book/src/scenes.md")]
    mod scenes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
