# Test package for card-auth-lab
