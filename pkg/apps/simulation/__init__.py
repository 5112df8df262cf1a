# Simulation app - NVT molecular dynamics
