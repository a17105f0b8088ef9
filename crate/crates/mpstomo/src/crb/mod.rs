//! Cramér-Rao machinery.
