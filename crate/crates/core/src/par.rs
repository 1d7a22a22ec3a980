// Order-preserving map over a slice or index range; rayon when the
// `parallel` feature is on, a plain iterator otherwise.

macro_rules! par_map {
    ($slice:expr, $f:expr) => {{
        #[cfg(feature = "parallel")]
        {
            use rayon::iter::{IntoParallelRefIterator, ParallelIterator};
            $slice.par_iter().map($f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            $slice.iter().map($f).collect()
        }
    }};
}

macro_rules! par_range_map {
    ($range:expr, $f:expr) => {{
        #[cfg(feature = "parallel")]
        {
            use rayon::iter::{IntoParallelIterator, ParallelIterator};
            ($range).into_par_iter().map($f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            ($range).into_iter().map($f).collect()
        }
    }};
}
