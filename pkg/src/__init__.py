# closed-curve criterion
