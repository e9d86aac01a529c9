# Reflection in the unit circle and the triangular ratio metric
