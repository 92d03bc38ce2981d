package app;

import java.awt.event.ActionEvent;
import java.awt.event.ActionListener;
import javax.swing.JButton;
import javax.swing.JLabel;

public class StatusBar {
  private final JLabel label = new JLabel();
  private final JButton clear = new JButton("Clear");

  public StatusBar() {
    clear.addActionListener(new ActionListener() {
      @Override
      public void actionPerformed(ActionEvent e) {
        label.setText("");
      }
    });
  }
}
