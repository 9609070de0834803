# This file makes Python treat directories containing it as modules.