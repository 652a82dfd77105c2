"""Air-ground coverage planning with mobile recharging rendezvous."""
