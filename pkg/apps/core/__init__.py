# Core app - grids, tables, state points, config forms and errors
