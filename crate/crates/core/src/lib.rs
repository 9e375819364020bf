pub mod cli;
pub mod dissection;
pub mod error;
pub mod qexpr;
pub mod report;
pub mod series;
pub mod theta;
pub mod vanish;

pub use error::{Error, Result};
pub use series::TruncatedSeries;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/products.md")]
    mod products {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/dissection.md")]
    mod dissection {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
