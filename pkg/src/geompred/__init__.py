# Temporary scaffold __init__; full public surface restored once all modules land.
