# Structure app - radial transforms, OZ/HNC and reference potentials
