"""Objects on products ``G1 x G2`` of homogeneous groups."""
