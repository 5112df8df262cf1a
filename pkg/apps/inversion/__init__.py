# Inversion app - update rules, driver and run catalog
