//! Window geometry: window size, block size, slide, and landmark budget.

use crate::Error;

/// Geometry of the count-based sliding window.
///
/// A window holds the latest `window_size` items, split into
/// `k = window_size / block_size` equal blocks; fairness is enforced per
/// block. `landmark_size` is the number of extra items the engine may
/// buffer past the window when an in-window reordering cannot restore
/// fairness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub window_size: usize,
    pub block_size: usize,
    /// Items per slide; verdicts are emitted on slide boundaries.
    pub slide: usize,
    pub landmark_size: usize,
}

impl WindowSpec {
    /// Validates that sizes are positive and `block_size` divides
    /// `window_size` exactly.
    pub fn new(
        window_size: usize,
        block_size: usize,
        slide: usize,
        landmark_size: usize,
    ) -> Result<Self, Error> {
        if window_size == 0 {
            return Err(Error::InvalidWindowSpec {
                reason: "window size must be positive",
            });
        }
        if block_size == 0 {
            return Err(Error::InvalidWindowSpec {
                reason: "block size must be positive",
            });
        }
        if !window_size.is_multiple_of(block_size) {
            return Err(Error::InvalidWindowSpec {
                reason: "block size must divide window size exactly",
            });
        }
        if slide == 0 {
            return Err(Error::InvalidWindowSpec {
                reason: "slide must be positive",
            });
        }
        Ok(Self {
            window_size,
            block_size,
            slide,
            landmark_size,
        })
    }

    /// Number of blocks per window, `k = |W|/s`.
    #[inline]
    pub fn blocks(&self) -> usize {
        self.window_size / self.block_size
    }

    /// 1-based block index of the window-relative position `j` (1-based).
    #[inline]
    pub fn block_of(&self, j: usize) -> usize {
        j.div_ceil(self.block_size)
    }
}
