from gravrec.script import plot_loss

if __name__ == "__main__":
    plot_loss.main()
